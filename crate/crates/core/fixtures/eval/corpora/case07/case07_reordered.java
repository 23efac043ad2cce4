try {
    ServerSocket listener = new ServerSocket(port);
    Socket client = listener.accept();
    InputStream incoming = client.getInputStream();
    int first = incoming.read();
} catch (IOException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
