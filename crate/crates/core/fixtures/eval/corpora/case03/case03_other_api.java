try {
    FileOutputStream sink = new FileOutputStream(target);
    sink.write(buffer);
    sink.close();
} catch (SQLException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
