package demo;

public class Cipher {
    private int shift;

    public Cipher() {
        this(3);
    }

    public Cipher(int shift) {
        this.shift = shift;
    }

    public String showBug(String plain) {
        StringBuilder sb = new StringBuilder();
        for (int i = 0; i < plain.length(); i++) {
            char c = plain.charAt(i);
            sb.append(c + shift);
        }
        System.out.println(sb);
        return sb.toString();
    }

    public void reset() {
    }
}
