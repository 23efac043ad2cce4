try {
    RandomAccessFile store = new RandomAccessFile(file, "rw");
    store.seek(offset);
    int value = store.read();
} catch (FileNotFoundException e) {
    e.printStackTrace();
} finally {
    close();
}
