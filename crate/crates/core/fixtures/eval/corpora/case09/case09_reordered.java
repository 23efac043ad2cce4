try {
    out.flush();
    out.newLine();
    out.write(entry);
    BufferedWriter out = new BufferedWriter(raw);
    FileWriter raw = new FileWriter(logFile);
} catch (IOException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
