try {
    RandomAccessFile store = new RandomAccessFile(file, "rw");
    store.seek(offset);
    int value = store.read();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
