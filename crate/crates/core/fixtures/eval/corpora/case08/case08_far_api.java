try {
    Thread worker = new Thread(task);
    worker.setName(label);
    worker.start();
    worker.join();
} catch (FileNotFoundException e) {
    e.printStackTrace();
} finally {
    close();
}
