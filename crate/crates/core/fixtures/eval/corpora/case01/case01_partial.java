try {
    URL endpoint = new URL(address);
    HttpURLConnection link = (HttpURLConnection) endpoint.openConnection();
} catch (IOException e) {
    e.printStackTrace();
}
