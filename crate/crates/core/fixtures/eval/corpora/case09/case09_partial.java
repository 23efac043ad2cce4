try {
    FileWriter raw = new FileWriter(logFile);
    BufferedWriter out = new BufferedWriter(raw);
} catch (IOException e) {
    e.printStackTrace();
}
