try {
    db.close();
    boolean any = rows.next();
    ResultSet rows = stmt.executeQuery(sql);
    Statement stmt = db.createStatement();
    Connection db = DriverManager.getConnection(jdbcUrl, user, secret);
} catch (SQLException e) {
    LOG.warn("giving up", e);
    throw new IllegalStateException(e);
}
