RandomAccessFile store = new RandomAccessFile(file, "rw");
store.seek(offset);
int value = store.read();
done();
