FileInputStream snapshot = new FileInputStream(stateFile);
ObjectInputStream decoder = new ObjectInputStream(snapshot);
Object restored = decoder.readObject();
decoder.close();
done();
