try {
    RandomAccessFile store = new RandomAccessFile(file, "rw");
    store.seek(offset);
    int value = store.read();
} catch (Exception e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
