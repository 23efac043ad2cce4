try {
    FileReader source = new FileReader(path);
    BufferedReader lines = new BufferedReader(source);
    String header = lines.readLine();
    lines.close();
} catch (FileNotFoundException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
