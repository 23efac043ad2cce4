try {
    Socket peer = new Socket(host, port);
    OutputStream wire = peer.getOutputStream();
    wire.write(payload);
    wire.flush();
    peer.close();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
