package demo;

public class Parser {
    public int showBug(String text) {
        int value = -1;
        try {
            value = Integer.parseInt(text);
        } catch (NumberFormatException e) {
        }
        return value * 2;
    }
}
