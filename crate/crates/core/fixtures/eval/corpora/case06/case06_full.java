try {
    FileOutputStream sink = new FileOutputStream(target);
    sink.write(buffer);
    sink.close();
} catch (FileNotFoundException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
} finally {
    cleanup();
}
