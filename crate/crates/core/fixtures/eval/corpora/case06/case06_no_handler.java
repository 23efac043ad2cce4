FileOutputStream sink = new FileOutputStream(target);
sink.write(buffer);
sink.close();
done();
