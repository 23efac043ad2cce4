// server
ServerSocket listener = new ServerSocket(port);
Socket client = listener.accept();
InputStream incoming = client.getInputStream();
report(listener);
