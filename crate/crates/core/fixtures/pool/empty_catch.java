try {
    URL target = new URL(endpoint);
    InputStream stream = target.openStream();
    stream.read(buffer);
    stream.close();
} catch (Exception e) {
}
