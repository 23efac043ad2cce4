// raf
RandomAccessFile store = new RandomAccessFile(file, "rw");
store.seek(offset);
report(store);
