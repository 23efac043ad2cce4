// Reads the status line of a web page.
URL url = new URL(address);
URLConnection connection = url.openConnection();
connection.setConnectTimeout(5000);
InputStream in = connection.getInputStream();
int first = in.read();
System.out.println("first byte " + first);
