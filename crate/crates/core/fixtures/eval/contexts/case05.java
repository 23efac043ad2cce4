// socket
Socket peer = new Socket(host, port);
OutputStream wire = peer.getOutputStream();
wire.write(payload);
wire.flush();
report(peer);
