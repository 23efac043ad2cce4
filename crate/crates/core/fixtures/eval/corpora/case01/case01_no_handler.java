URL endpoint = new URL(address);
HttpURLConnection link = (HttpURLConnection) endpoint.openConnection();
link.setRequestMethod("GET");
InputStream body = link.getInputStream();
int status = link.getResponseCode();
done();
