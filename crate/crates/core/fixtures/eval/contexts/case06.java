// fileout
FileOutputStream sink = new FileOutputStream(target);
sink.write(buffer);
report(sink);
