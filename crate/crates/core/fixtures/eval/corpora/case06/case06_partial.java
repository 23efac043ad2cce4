try {
    FileOutputStream sink = new FileOutputStream(target);
    sink.write(buffer);
} catch (FileNotFoundException e) {
    e.printStackTrace();
}
