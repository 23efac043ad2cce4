// Copy every record from the archive into the ledger.
File archive = new File(archivePath);
FileReader source = new FileReader(archive);
Scanner scanner = new Scanner(source);
try {
    while (scanner.hasNextLine()) {
        ledger.append(scanner.nextLine());
    }
} catch (IOException ioe) {
    ledger.rollback();
} finally {
    scanner.close();
}
