try {
    ServerSocket listener = new ServerSocket(port);
    Socket client = listener.accept();
    InputStream incoming = client.getInputStream();
    int first = incoming.read();
} catch (IOException e) {
    e.printStackTrace();
} finally {
    close();
}
