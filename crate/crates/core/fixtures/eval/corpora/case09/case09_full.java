try {
    FileWriter raw = new FileWriter(logFile);
    BufferedWriter out = new BufferedWriter(raw);
    out.write(entry);
    out.newLine();
    out.flush();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
