try {
    Connection db = DriverManager.getConnection(jdbcUrl, user, secret);
    Statement stmt = db.createStatement();
    ResultSet rows = stmt.executeQuery(sql);
    boolean any = rows.next();
    db.close();
} catch (ClassNotFoundException e) {
    log.error("request failed", e);
    notifyUser(e.getMessage());
    return null;
}
