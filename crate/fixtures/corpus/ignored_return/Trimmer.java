package demo;

public class Trimmer {
    public String showBug(String raw) {
        String s = raw;
        s.trim();
        s.toUpperCase();
        return s;
    }
}
