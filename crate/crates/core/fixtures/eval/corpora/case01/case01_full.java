try {
    URL endpoint = new URL(address);
    HttpURLConnection link = (HttpURLConnection) endpoint.openConnection();
    link.setRequestMethod("GET");
    InputStream body = link.getInputStream();
    int status = link.getResponseCode();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
