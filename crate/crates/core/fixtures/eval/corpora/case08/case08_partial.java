try {
    RandomAccessFile store = new RandomAccessFile(file, "rw");
    store.seek(offset);
} catch (FileNotFoundException e) {
    e.printStackTrace();
}
