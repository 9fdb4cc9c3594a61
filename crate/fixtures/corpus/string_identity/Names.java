package demo;

public class Names {
    private String expected = "admin";

    public boolean showBug(String user) {
        String copy = new String(user);
        boolean same = copy == expected;
        return same;
    }
}
