try {
    FileReader source = new FileReader(path);
    BufferedReader lines = new BufferedReader(source);
    String header = lines.readLine();
    lines.close();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
