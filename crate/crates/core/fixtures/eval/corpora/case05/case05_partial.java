try {
    Socket peer = new Socket(host, port);
    OutputStream wire = peer.getOutputStream();
} catch (IOException e) {
    e.printStackTrace();
}
