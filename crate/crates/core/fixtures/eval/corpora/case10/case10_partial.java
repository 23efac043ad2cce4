try {
    FileInputStream snapshot = new FileInputStream(stateFile);
    ObjectInputStream decoder = new ObjectInputStream(snapshot);
} catch (ClassNotFoundException e) {
    e.printStackTrace();
}
