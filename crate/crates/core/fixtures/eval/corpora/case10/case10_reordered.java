try {
    FileInputStream snapshot = new FileInputStream(stateFile);
    ObjectInputStream decoder = new ObjectInputStream(snapshot);
    Object restored = decoder.readObject();
    decoder.close();
} catch (ClassNotFoundException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
