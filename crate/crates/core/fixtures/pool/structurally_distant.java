// Persist the order; report and recover on failure.
Connection db = pool.take();
try {
    PreparedStatement insert = db.prepareStatement(INSERT_ORDER);
    insert.setLong(1, order.id());
    insert.executeUpdate();
    db.commit();
} catch (SQLException sqle) {
    logger.error("order insert failed", sqle);
    db.rollback();
    metrics.increment("orders.failed");
} catch (IOException ioe) {
    logger.error("journal write failed", ioe);
    journal.reopen();
} finally {
    pool.release(db);
    metrics.flush();
}
