// filereader
FileReader source = new FileReader(path);
BufferedReader lines = new BufferedReader(source);
String header = lines.readLine();
report(source);
