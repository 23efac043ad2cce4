try {
    FileReader source = new FileReader(path);
    BufferedReader lines = new BufferedReader(source);
} catch (FileNotFoundException e) {
    e.printStackTrace();
}
