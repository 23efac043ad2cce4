try {
    Socket peer = new Socket(host, port);
    OutputStream wire = peer.getOutputStream();
    wire.write(payload);
    wire.flush();
    peer.close();
} catch (IOException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
