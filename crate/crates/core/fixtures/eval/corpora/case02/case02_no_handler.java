FileReader source = new FileReader(path);
BufferedReader lines = new BufferedReader(source);
String header = lines.readLine();
lines.close();
done();
