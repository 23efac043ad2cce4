try {
    FileInputStream snapshot = new FileInputStream(stateFile);
    ObjectInputStream decoder = new ObjectInputStream(snapshot);
    Object restored = decoder.readObject();
    decoder.close();
} catch (ClassNotFoundException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
