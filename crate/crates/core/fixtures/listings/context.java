//more code ...
try {
       URL url=new URL(WEB_SERVICE_URL_WITH_PARAMS);
       HttpURLConnection conn=(HttpURLConnection)url.openConnection();
       //more code goes here ...
    } catch (Exception e) { }// generic exception handler 
