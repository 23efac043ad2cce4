try {
    ServerSocket listener = new ServerSocket(port);
    Socket client = listener.accept();
} catch (IOException e) {
    e.printStackTrace();
}
