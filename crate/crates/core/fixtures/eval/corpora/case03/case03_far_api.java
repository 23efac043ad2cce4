try {
    FileWriter raw = new FileWriter(logFile);
    BufferedWriter out = new BufferedWriter(raw);
    out.write(entry);
    out.newLine();
    out.flush();
} catch (SQLException e) {
    e.printStackTrace();
} finally {
    close();
}
