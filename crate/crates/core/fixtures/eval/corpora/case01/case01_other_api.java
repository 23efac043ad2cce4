try {
    Thread worker = new Thread(task);
    worker.setName(label);
    worker.start();
    worker.join();
} catch (IOException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
