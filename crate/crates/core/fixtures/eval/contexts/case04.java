// thread
Thread worker = new Thread(task);
worker.setName(label);
worker.start();
report(worker);
