try {
    ServerSocket listener = new ServerSocket(port);
    Socket client = listener.accept();
    InputStream incoming = client.getInputStream();
    int first = incoming.read();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
