try {
    FileInputStream snapshot = new FileInputStream(stateFile);
    ObjectInputStream decoder = new ObjectInputStream(snapshot);
    Object restored = decoder.readObject();
    decoder.close();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
