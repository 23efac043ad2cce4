try {
    Thread worker = new Thread(task);
    worker.setName(label);
} catch (InterruptedException e) {
    e.printStackTrace();
}
