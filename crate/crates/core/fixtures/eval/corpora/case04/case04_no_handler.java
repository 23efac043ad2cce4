Thread worker = new Thread(task);
worker.setName(label);
worker.start();
worker.join();
done();
