// writer
FileWriter raw = new FileWriter(logFile);
BufferedWriter out = new BufferedWriter(raw);
out.write(entry);
out.newLine();
report(raw);
