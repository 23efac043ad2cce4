try {
    FileOutputStream sink = new FileOutputStream(target);
    sink.write(buffer);
    sink.close();
} catch (ClassNotFoundException e) {
    e.printStackTrace();
} finally {
    close();
}
