try {
    FileReader source = new FileReader(path);
    BufferedReader lines = new BufferedReader(source);
    String header = lines.readLine();
    lines.close();
} catch (FileNotFoundException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
