// objects
FileInputStream snapshot = new FileInputStream(stateFile);
ObjectInputStream decoder = new ObjectInputStream(snapshot);
Object restored = decoder.readObject();
report(snapshot);
