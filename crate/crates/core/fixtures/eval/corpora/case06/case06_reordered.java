try {
    sink.close();
    sink.write(buffer);
    FileOutputStream sink = new FileOutputStream(target);
} catch (FileNotFoundException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
