try {
    Thread worker = new Thread(task);
    worker.setName(label);
    worker.start();
    worker.join();
} catch (Exception e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
