try {
    Connection db = DriverManager.getConnection(jdbcUrl, user, secret);
    Statement stmt = db.createStatement();
} catch (SQLException e) {
    e.printStackTrace();
}
