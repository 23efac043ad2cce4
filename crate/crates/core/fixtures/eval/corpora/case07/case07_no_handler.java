ServerSocket listener = new ServerSocket(port);
Socket client = listener.accept();
InputStream incoming = client.getInputStream();
int first = incoming.read();
done();
