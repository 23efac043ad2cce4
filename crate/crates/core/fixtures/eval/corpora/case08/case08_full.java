try {
    RandomAccessFile store = new RandomAccessFile(file, "rw");
    store.seek(offset);
    int value = store.read();
} catch (FileNotFoundException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
